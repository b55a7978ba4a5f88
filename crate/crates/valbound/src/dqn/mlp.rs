//! Multilayer perceptron with rectifier hidden layers, a linear output, and
//! explicit backpropagation for the clipped DQN losses.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Network parameters. `sizes` chains input through hidden layers to the
/// output; weight `l` maps activations of width `sizes[l]` to `sizes[l+1]`.
#[derive(Clone, Debug)]
pub struct MlpParams {
    pub sizes: Vec<usize>,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

/// Parameter-shaped gradient accumulator.
#[derive(Clone, Debug)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

#[derive(Serialize, Deserialize)]
struct MlpDocument {
    sizes: Vec<usize>,
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
}

impl MlpParams {
    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::Shape(
                "an MLP needs at least input and output sizes".into(),
            ));
        }
        if sizes.iter().any(|&n| n == 0) {
            return Err(Error::Shape("layer sizes must be positive".into()));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in sizes.windows(2) {
            weights.push(Array2::zeros((w[0], w[1])));
            biases.push(Array1::zeros(w[1]));
        }
        Ok(MlpParams {
            sizes: sizes.to_vec(),
            weights,
            biases,
        })
    }

    /// Uniform Glorot initialization, biases zero.
    pub fn init(sizes: &[usize], rng: &mut Stream) -> Result<Self> {
        let mut p = Self::zeros(sizes)?;
        for w in &mut p.weights {
            let (fan_in, fan_out) = w.dim();
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for x in w.iter_mut() {
                *x = rng.uniform_in(-limit, limit);
            }
        }
        Ok(p)
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    /// Forward pass for one input row.
    pub fn forward(&self, input: &[f64]) -> Result<Array1<f64>> {
        if input.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input has {} features, network expects {}",
                input.len(),
                self.input_dim()
            )));
        }
        let mut h = Array1::from_iter(input.iter().copied());
        for l in 0..self.num_layers() {
            let mut z = h.dot(&self.weights[l]) + &self.biases[l];
            if l + 1 < self.num_layers() {
                z.mapv_inplace(|x| x.max(0.0));
            }
            h = z;
        }
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("network output is not finite".into()));
        }
        Ok(h)
    }

    /// Forward pass for a batch (rows are inputs).
    pub fn forward_batch(&self, inputs: &Array2<f64>) -> Result<Array2<f64>> {
        Ok(self.forward_batch_cached(inputs)?.pop().unwrap())
    }

    /// Forward pass keeping every layer's activations (index 0 is the input,
    /// the last entry is the output).
    pub fn forward_batch_cached(&self, inputs: &Array2<f64>) -> Result<Vec<Array2<f64>>> {
        if inputs.ncols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "batch has {} features, network expects {}",
                inputs.ncols(),
                self.input_dim()
            )));
        }
        let mut acts = Vec::with_capacity(self.num_layers() + 1);
        acts.push(inputs.clone());
        for l in 0..self.num_layers() {
            let mut z = acts[l].dot(&self.weights[l]) + &self.biases[l];
            if l + 1 < self.num_layers() {
                z.mapv_inplace(|x| x.max(0.0));
            }
            acts.push(z);
        }
        if acts.last().unwrap().iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("network output is not finite".into()));
        }
        Ok(acts)
    }

    /// In-place SGD update, with the gradient rescaled when its overall
    /// 2-norm exceeds `max_grad_norm` (0 disables the cap).
    pub fn sgd_step(&mut self, grads: &Gradients, learning_rate: f64, max_grad_norm: f64) {
        let mut scale = 1.0;
        if max_grad_norm > 0.0 {
            let mut sq = 0.0;
            for g in &grads.weights {
                sq += g.iter().map(|x| x * x).sum::<f64>();
            }
            for g in &grads.biases {
                sq += g.iter().map(|x| x * x).sum::<f64>();
            }
            let norm = sq.sqrt();
            if norm > max_grad_norm {
                scale = max_grad_norm / norm;
            }
        }
        let step = learning_rate * scale;
        for (w, g) in self.weights.iter_mut().zip(&grads.weights) {
            w.scaled_add(-step, g);
        }
        for (b, g) in self.biases.iter_mut().zip(&grads.biases) {
            b.scaled_add(-step, g);
        }
    }

    /// Polyak blend from another network: `self = tau other + (1 - tau) self`.
    pub fn polyak_from(&mut self, other: &MlpParams, tau: f64) {
        if tau >= 1.0 {
            self.weights.clone_from(&other.weights);
            self.biases.clone_from(&other.biases);
            return;
        }
        for (w, o) in self.weights.iter_mut().zip(&other.weights) {
            w.zip_mut_with(o, |a, b| *a = tau * *b + (1.0 - tau) * *a);
        }
        for (b, o) in self.biases.iter_mut().zip(&other.biases) {
            b.zip_mut_with(o, |a, x| *a = tau * *x + (1.0 - tau) * *a);
        }
    }

    /// Checkpoint as JSON (`{sizes, weights, biases}` with 17-digit floats).
    pub fn to_json_string(&self) -> Result<String> {
        let doc = MlpDocument {
            sizes: self.sizes.clone(),
            weights: self
                .weights
                .iter()
                .map(|w| w.outer_iter().map(|r| r.to_vec()).collect())
                .collect(),
            biases: self.biases.iter().map(|b| b.to_vec()).collect(),
        };
        Ok(crate::io::to_json_string_pretty(&doc)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: MlpDocument = serde_json::from_str(text)?;
        let mut p = Self::zeros(&doc.sizes)?;
        if doc.weights.len() != p.weights.len() || doc.biases.len() != p.biases.len() {
            return Err(Error::Shape("checkpoint layer count mismatch".into()));
        }
        for (l, w) in doc.weights.iter().enumerate() {
            let (rows, cols) = p.weights[l].dim();
            if w.len() != rows || w.iter().any(|r| r.len() != cols) {
                return Err(Error::Shape(format!(
                    "checkpoint weight {l} shape mismatch"
                )));
            }
            for (i, row) in w.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    p.weights[l][[i, j]] = x;
                }
            }
        }
        for (l, b) in doc.biases.iter().enumerate() {
            if b.len() != p.biases[l].len() {
                return Err(Error::Shape(format!("checkpoint bias {l} shape mismatch")));
            }
            p.biases[l] = Array1::from_vec(b.clone());
        }
        Ok(p)
    }
}

/// Per-sample clip window for the soft-clipping loss term.
pub struct ClipPenalty<'a> {
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub eta: f64,
}

/// Gradients of the mean squared Bellman error over a batch, on the acted
/// outputs, plus the eta-weighted clipping penalty when configured. The
/// penalty is the mean absolute escape of the predicted value from its
/// per-sample bounds, so it vanishes (with zero gradient) whenever the
/// prediction already respects them.
///
/// Returns `(gradients, bellman_loss, clip_loss)`.
pub fn mlp_gradients(
    params: &MlpParams,
    inputs: &Array2<f64>,
    actions: &[usize],
    targets: &[f64],
    clip: Option<&ClipPenalty<'_>>,
) -> Result<(Gradients, f64, f64)> {
    let acts = params.forward_batch_cached(inputs)?;
    gradients_from_cache(params, &acts, actions, targets, clip)
}

/// Backward pass over precomputed activations (`acts[0]` is the input batch).
pub fn gradients_from_cache(
    params: &MlpParams,
    acts: &[Array2<f64>],
    actions: &[usize],
    targets: &[f64],
    clip: Option<&ClipPenalty<'_>>,
) -> Result<(Gradients, f64, f64)> {
    let batch = acts[0].nrows();
    if actions.len() != batch || targets.len() != batch {
        return Err(Error::Shape(format!(
            "batch of {batch} rows with {} actions and {} targets",
            actions.len(),
            targets.len()
        )));
    }
    if let Some(c) = clip {
        if c.lower.len() != batch || c.upper.len() != batch {
            return Err(Error::Shape("clip windows must match the batch".into()));
        }
    }
    let output = acts.last().unwrap();
    let layers = params.num_layers();
    let scale = 1.0 / batch as f64;

    let mut bellman_loss = 0.0;
    let mut clip_loss = 0.0;
    let mut delta = Array2::zeros(output.dim());
    for i in 0..batch {
        let a = actions[i];
        if a >= output.ncols() {
            return Err(Error::Shape(format!("action {a} out of range")));
        }
        let q = output[[i, a]];
        let err = q - targets[i];
        bellman_loss += err * err;
        let mut g = 2.0 * err;
        if let Some(c) = clip {
            let clipped = q.max(c.lower[i]).min(c.upper[i]);
            let escape = q - clipped;
            clip_loss += escape.abs();
            g += c.eta * escape.signum() * if escape == 0.0 { 0.0 } else { 1.0 };
        }
        delta[[i, a]] = g * scale;
    }
    bellman_loss *= scale;
    clip_loss *= scale;
    if !bellman_loss.is_finite() {
        return Err(Error::NonFinite(format!(
            "training loss diverged (bellman loss {bellman_loss})"
        )));
    }

    let mut grads = Gradients {
        weights: Vec::with_capacity(layers),
        biases: Vec::with_capacity(layers),
    };
    // Backwards through the layers; delta holds dL/dz of the current layer.
    for l in (0..layers).rev() {
        let dw = acts[l].t().dot(&delta);
        let db = delta.sum_axis(Axis(0));
        if l > 0 {
            let mut back = delta.dot(&params.weights[l].t());
            back.zip_mut_with(&acts[l], |d, h| {
                if *h <= 0.0 {
                    *d = 0.0;
                }
            });
            delta = back;
        }
        grads.weights.push(dw);
        grads.biases.push(db);
    }
    grads.weights.reverse();
    grads.biases.reverse();
    for g in grads
        .weights
        .iter()
        .chain(std::iter::once(&grads.weights[0]))
    {
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("gradient is not finite".into()));
        }
    }
    Ok((grads, bellman_loss, clip_loss))
}
